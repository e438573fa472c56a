qreg = QuantumRegister(3)
creg = ClassicalRegister(3)
spare = ClassicalRegister(2)
qc = QuantumCircuit(qreg, creg)
qc.h(0)
