# Bundled model configuration documents (YAML), loaded via importlib.resources.
