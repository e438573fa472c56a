# buggy
qr = QuantumRegister(2, name='qreg')
cr = ClassicalRegister(2, name='creg')
qc = QuantumCircuit(qr,cr)
qc.h(qr)
qc.measure_all()
