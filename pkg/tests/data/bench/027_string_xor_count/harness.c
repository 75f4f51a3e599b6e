#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <math.h>

#define CHECK(c) do { if (!(c)) { fails++; fprintf(stderr, "check failed: %s\n", #c); } } while (0)

int string_xor_count(const char *a, const char *b, char *out);

int main(void) {
    int fails = 0;
    char buf[16];
    CHECK(string_xor_count("010", "110", buf) == 1);
    CHECK(strcmp(buf, "100") == 0);
    CHECK(string_xor_count("111000", "101010", buf) == 2);
    return fails != 0;
}
