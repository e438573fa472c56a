c = QuantumCircuit(5, 5)
for i in range(3):
    c.measure(i, i)
