# Three-point energy toolkit
