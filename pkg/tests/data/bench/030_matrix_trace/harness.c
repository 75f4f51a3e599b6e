#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <math.h>

#define CHECK(c) do { if (!(c)) { fails++; fprintf(stderr, "check failed: %s\n", #c); } } while (0)

struct matrix { int n; int cells[16]; };
int matrix_trace(const struct matrix *m);

int main(void) {
    int fails = 0;
    struct matrix m = {3, {1, 2, 3, 4, 5, 6, 7, 8, 9}};
    CHECK(matrix_trace(&m) == 15);
    return fails != 0;
}
