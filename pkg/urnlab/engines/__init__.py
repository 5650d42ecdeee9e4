# Analysis engines, one per model concern
