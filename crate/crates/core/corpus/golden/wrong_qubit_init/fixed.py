



# fixed
qc = QuantumCircuit(2)
qc.h(1)
...
