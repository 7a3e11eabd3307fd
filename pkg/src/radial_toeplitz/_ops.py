"""Opcode table for compiled radial-symbol programs.

A symbol's AST compiles to a flat postfix program: parallel arrays
(ops, arg1, arg2).  Programs evaluate on a vector of radii in the
signed-log domain -- each stack slot is a (sign, log_abs) pair -- so
factors like exp(-exp(r)) survive far below double underflow.
"""

OP_NUM = 0   # push literal; arg1 = value
OP_R = 1     # push r
OP_ADD = 2
OP_SUB = 3
OP_MUL = 4
OP_DIV = 5
OP_POW = 6   # arg1 = exponent literal
OP_NEG = 7
OP_EXP = 8
OP_SIN = 9
OP_COS = 10
OP_CHI = 11  # push indicator of [arg1, arg2]
OP_ABS = 12
OP_POS = 13  # positive part max(., 0)

ARITY = {
    OP_NUM: 0, OP_R: 0, OP_CHI: 0,
    OP_ADD: 2, OP_SUB: 2, OP_MUL: 2, OP_DIV: 2,
    OP_POW: 1, OP_NEG: 1, OP_EXP: 1, OP_SIN: 1, OP_COS: 1,
    OP_ABS: 1, OP_POS: 1,
}

# exp(x) overflows past this; used when restoring linear values
LINEAR_EXP_CAP = 709.0
