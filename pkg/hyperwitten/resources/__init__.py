"""Built-in potentials and equations (JSON)"""
