#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <math.h>

#define CHECK(c) do { if (!(c)) { fails++; fprintf(stderr, "check failed: %s\n", #c); } } while (0)

int modp(int n, int p);

int main(void) {
    int fails = 0;
    CHECK(modp(3, 5) == 3);
    CHECK(modp(1101, 101) == 2);
    CHECK(modp(100, 101) == 1);
    return fails != 0;
}
