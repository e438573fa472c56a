qc = QuantumCircuit(2, 2)
gt = Gate('pair_gate', 2, [])
qc.append(gt, [0, 1])
