qc = QuantumCircuit(3, 3)

# prepare
qc.x(0)

qc.measure([0, 1, 1+1], [0, 1, 2])  # read out
