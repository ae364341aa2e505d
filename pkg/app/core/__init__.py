"""Numerical core: polynomials, Blaschke products, Schur algorithm, quadrature, domains"""
