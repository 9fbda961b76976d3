"""Command-line presentation: report rendering and the labeling wizard."""
