typedef int (*binop_fn)(int, int);

static int add_op(int a, int b) {
    return a + b;
}

static int mul_op(int a, int b) {
    return a * b;
}

int apply_op(const int *values, int n, int multiply) {
    binop_fn op = multiply ? mul_op : add_op;
    int acc = multiply ? 1 : 0;
    for (int i = 0; i < n; i++)
        acc = op(acc, values[i]);
    return acc;
}
