"""Average gate fidelity of trace-preserving qudit maps."""
