# Utility helpers shared by the engines and the CLI
