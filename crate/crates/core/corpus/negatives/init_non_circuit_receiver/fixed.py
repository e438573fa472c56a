qc = QuantumCircuit(2)
qc.x(0)
helper.h(1)
