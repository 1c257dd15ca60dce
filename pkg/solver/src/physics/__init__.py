# Physics Package
