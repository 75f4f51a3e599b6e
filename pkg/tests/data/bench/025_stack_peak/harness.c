#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <math.h>

#define CHECK(c) do { if (!(c)) { fails++; fprintf(stderr, "check failed: %s\n", #c); } } while (0)

int stack_peak(const int *ops, int n);

int main(void) {
    int fails = 0;
    int a[] = {1, 2, 3, 0, 0, 4, 5, 6, 7};
    int b[] = {0, 0, 1, 0};
    CHECK(stack_peak(a, 9) == 5);
    CHECK(stack_peak(b, 4) == 1);
    return fails != 0;
}
