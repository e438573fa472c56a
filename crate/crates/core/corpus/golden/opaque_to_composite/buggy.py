# buggy
qc = QuantumCircuit(3, 3)
gt = Gate('my_custom_gate', 3, [])
qc.append(gt, [0, 1, 2])
...
