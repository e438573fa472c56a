




# fixed
qc = QuantumCircuit(3, 3)
sub_circuit = QuantumCircuit(3, name='sub_circ')
... # Apply basic gates to sub_circuit to emulate gt's behaviour
gt = sub_circuit.to_instruction()
qc.append(gt, [0, 1, 2])
...
