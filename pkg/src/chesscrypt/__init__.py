"""Cryptanalysis workbench for the Chessography chess-based cipher."""
