c = QuantumCircuit(5, 5)
for i in range(5):
    c.measure(i, i)
