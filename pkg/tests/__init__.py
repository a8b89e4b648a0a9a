# Tests for the three-point energy toolkit
