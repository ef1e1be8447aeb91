"""Tests package for Cartan Synthesis"""
