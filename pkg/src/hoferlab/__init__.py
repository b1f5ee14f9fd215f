"""Local model of an A3-configuration: twists, chords, Floer barcodes and Hofer bounds."""
