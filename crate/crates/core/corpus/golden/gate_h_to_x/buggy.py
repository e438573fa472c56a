# buggy
qc = QuantumCircuit(2)
circuit.h(0)
qc.h(1)
...
