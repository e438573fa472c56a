qc = QuantumCircuit(2, 2)
qc.h(0)
qc.h(0)
qc.h(1)
