#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <math.h>

#define CHECK(c) do { if (!(c)) { fails++; fprintf(stderr, "check failed: %s\n", #c); } } while (0)

long sum_to_n(int n);

int main(void) {
    int fails = 0;
    CHECK(sum_to_n(30) == 465);
    CHECK(sum_to_n(100) == 5050);
    return fails != 0;
}
