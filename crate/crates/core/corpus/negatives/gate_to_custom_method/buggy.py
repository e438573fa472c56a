qc = QuantumCircuit(2)
qc.h(0)
qc.x(1)
