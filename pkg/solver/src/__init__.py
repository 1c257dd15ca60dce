# Quantum tunneling solver package
