qc = QuantumCircuit(2, 2)
sub = QuantumCircuit(2)
gt = sub.to_instruction()
qc.append(gt, [0, 1])
