"""Test suite for MTG Draft Analyzer."""
