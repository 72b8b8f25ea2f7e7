# STOL - Structured Transfer Output Learning
