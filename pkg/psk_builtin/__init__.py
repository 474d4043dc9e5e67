"""Built-in prodsketch features: sketches, protocols, hard instances and the harness."""
