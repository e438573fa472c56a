# buggy
qc = QuantumCircuit(2)
qc.h(0+1)
...
