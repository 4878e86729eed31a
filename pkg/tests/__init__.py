""" Test fusionblocks."""
