"""Java backend: preprocessor, NR and SCHA resolvers."""
