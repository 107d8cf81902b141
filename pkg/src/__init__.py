"""Prime splitting in fields generated by quadratic points on hyperelliptic modular curves"""
