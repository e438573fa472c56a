






# fixed
qreg = QuantumRegister(10)
creg = ClassicalRegister(10)
circ = QuantumCircuit(qreg, creg)
for i in range(5):
    circ.measure(qreg[i], mreg[i]
...
