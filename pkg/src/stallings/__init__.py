"""Uniform random generation of subgroups of free groups via Stallings graphs."""
