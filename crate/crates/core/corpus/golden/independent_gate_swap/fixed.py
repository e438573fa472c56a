




# fixed
qc = QuantumCircuit(2)
qc.x(1)
qc.h(0)    
...
