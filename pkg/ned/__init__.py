"""Word-expert named entity disambiguation against an encyclopedia-derived dictionary."""
