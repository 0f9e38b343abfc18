"""Exact formal variational calculus on jet spaces of scalar evolution equations."""
