"""Regenerate tests/data/bench from the function table below.

Each sample gets source.c, harness.c, meta.json and a synthetic pseudo.txt.
No decompiler is available offline, so the pseudocode is produced by
renaming user identifiers the way stripped-binary decompilers do
(sub_XXXXXX, vN, field_N) while keeping library names intact.

    python3 tests/data/build_bench.py
"""
from __future__ import annotations

import json
import re
import shutil
from pathlib import Path

from decompkit.obfuscate import obfuscate
from decompkit.reserved import extract_reserved

LEVELS = ("O0", "O1", "O2", "O3")

HARNESS = """#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <math.h>

#define CHECK(c) do {{ if (!(c)) {{ fails++; fprintf(stderr, "check failed: %s\\n", #c); }} }} while (0)

{decls}

int main(void) {{
    int fails = 0;
{body}
    return fails != 0;
}}
"""

FUNCS = [
    ("has_close_elements", """#include <math.h>

int has_close_elements(const double *numbers, int size, double threshold) {
    for (int i = 0; i < size; i++)
        for (int j = i + 1; j < size; j++)
            if (fabs(numbers[i] - numbers[j]) < threshold)
                return 1;
    return 0;
}
""", "int has_close_elements(const double *numbers, int size, double threshold);", """
    double a[] = {1.0, 2.0, 3.9, 4.0, 5.0, 2.2};
    CHECK(has_close_elements(a, 6, 0.3) == 1);
    CHECK(has_close_elements(a, 6, 0.05) == 0);
"""),
    ("below_zero", """int below_zero(const int *operations, int n) {
    int balance = 0;
    for (int i = 0; i < n; i++) {
        balance += operations[i];
        if (balance < 0)
            return 1;
    }
    return 0;
}
""", "int below_zero(const int *operations, int n);", """
    int a[] = {1, 2, -4, 5};
    int b[] = {1, 2, -3, 1, 2, -3};
    CHECK(below_zero(a, 4) == 1);
    CHECK(below_zero(b, 6) == 0);
"""),
    ("greatest_common_divisor", """int greatest_common_divisor(int a, int b) {
    while (b != 0) {
        int t = a % b;
        a = b;
        b = t;
    }
    return a;
}
""", "int greatest_common_divisor(int a, int b);", """
    CHECK(greatest_common_divisor(3, 7) == 1);
    CHECK(greatest_common_divisor(10, 15) == 5);
    CHECK(greatest_common_divisor(144, 60) == 12);
"""),
    ("count_distinct_characters", """#include <ctype.h>
#include <string.h>

int count_distinct_characters(const char *text) {
    int seen[256] = {0};
    int count = 0;
    size_t len = strlen(text);
    for (size_t i = 0; i < len; i++) {
        unsigned char c = (unsigned char)tolower((unsigned char)text[i]);
        if (!seen[c]) {
            seen[c] = 1;
            count++;
        }
    }
    return count;
}
""", "int count_distinct_characters(const char *text);", """
    CHECK(count_distinct_characters("xyzXYZ") == 3);
    CHECK(count_distinct_characters("Jerry jERRY JeRRRY") == 5);
    CHECK(count_distinct_characters("") == 0);
"""),
    ("is_prime", """int is_prime(long n) {
    if (n < 2)
        return 0;
    for (long k = 2; k * k <= n; k++)
        if (n % k == 0)
            return 0;
    return 1;
}
""", "int is_prime(long n);", """
    CHECK(is_prime(6) == 0);
    CHECK(is_prime(101) == 1);
    CHECK(is_prime(13441) == 1);
    CHECK(is_prime(1) == 0);
"""),
    ("fib", """int fib(int n) {
    if (n < 2)
        return n;
    int prev = 0, cur = 1;
    for (int i = 2; i <= n; i++) {
        int next = prev + cur;
        prev = cur;
        cur = next;
    }
    return cur;
}
""", "int fib(int n);", """
    CHECK(fib(10) == 55);
    CHECK(fib(1) == 1);
    CHECK(fib(12) == 144);
"""),
    ("is_palindrome", """#include <string.h>

int is_palindrome(const char *text) {
    size_t left = 0;
    size_t right = strlen(text);
    while (left + 1 < right) {
        if (text[left] != text[right - 1])
            return 0;
        left++;
        right--;
    }
    return 1;
}
""", "int is_palindrome(const char *text);", """
    CHECK(is_palindrome("") == 1);
    CHECK(is_palindrome("aba") == 1);
    CHECK(is_palindrome("zbcd") == 0);
"""),
    ("modp", """int modp(int n, int p) {
    int result = 1;
    for (int i = 0; i < n; i++)
        result = (result * 2) % p;
    return result;
}
""", "int modp(int n, int p);", """
    CHECK(modp(3, 5) == 3);
    CHECK(modp(1101, 101) == 2);
    CHECK(modp(100, 101) == 1);
"""),
    ("sum_to_n", """long sum_to_n(int n) {
    long total = 0;
    for (int i = 1; i <= n; i++)
        total += i;
    return total;
}
""", "long sum_to_n(int n);", """
    CHECK(sum_to_n(30) == 465);
    CHECK(sum_to_n(100) == 5050);
"""),
    ("correct_bracketing", """int correct_bracketing(const char *brackets) {
    int depth = 0;
    for (const char *p = brackets; *p; p++) {
        if (*p == '(')
            depth++;
        else if (*p == ')')
            depth--;
        if (depth < 0)
            return 0;
    }
    return depth == 0;
}
""", "int correct_bracketing(const char *brackets);", """
    CHECK(correct_bracketing("()") == 1);
    CHECK(correct_bracketing("(()())") == 1);
    CHECK(correct_bracketing(")(()") == 0);
"""),
    ("largest_prime_factor", """static int divides(int n, int k) {
    return n % k == 0;
}

int largest_prime_factor(int n) {
    int largest = 1;
    for (int k = 2; k * k <= n; k++) {
        while (divides(n, k)) {
            largest = k;
            n /= k;
        }
    }
    if (n > 1)
        largest = n;
    return largest;
}
""", "int largest_prime_factor(int n);", """
    CHECK(largest_prime_factor(15) == 5);
    CHECK(largest_prime_factor(13195) == 29);
    CHECK(largest_prime_factor(2048) == 2);
"""),
    ("vowels_count", """#include <ctype.h>
#include <string.h>

int vowels_count(const char *word) {
    int count = 0;
    size_t n = strlen(word);
    for (size_t i = 0; i < n; i++) {
        char c = (char)tolower((unsigned char)word[i]);
        if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u')
            count++;
    }
    if (n > 0 && tolower((unsigned char)word[n - 1]) == 'y')
        count++;
    return count;
}
""", "int vowels_count(const char *word);", """
    CHECK(vowels_count("abcde") == 2);
    CHECK(vowels_count("ACEDY") == 3);
    CHECK(vowels_count("bcd") == 0);
"""),
    ("digit_sum_upper", """int digit_sum_upper(const char *s) {
    int sum = 0;
    while (*s) {
        if (*s >= 'A' && *s <= 'Z')
            sum += *s;
        s++;
    }
    return sum;
}
""", "int digit_sum_upper(const char *s);", """
    CHECK(digit_sum_upper("abAB") == 131);
    CHECK(digit_sum_upper("helloE") == 69);
    CHECK(digit_sum_upper("") == 0);
"""),
    ("search_max_freq", """#include <stdlib.h>

int search_max_freq(const int *values, int n) {
    int best = -1;
    int *freq = calloc(1001, sizeof(int));
    if (freq == NULL)
        return -1;
    for (int i = 0; i < n; i++)
        if (values[i] > 0 && values[i] <= 1000)
            freq[values[i]]++;
    for (int v = 1; v <= 1000; v++)
        if (freq[v] >= v)
            best = v;
    free(freq);
    return best;
}
""", "int search_max_freq(const int *values, int n);", """
    int a[] = {4, 1, 2, 2, 3, 1};
    int b[] = {5, 5, 4, 4, 4};
    CHECK(search_max_freq(a, 6) == 2);
    CHECK(search_max_freq(b, 5) == -1);
"""),
    ("triangle_area", """#include <math.h>

double triangle_area(double a, double b, double c) {
    if (a + b <= c || a + c <= b || b + c <= a)
        return -1.0;
    double s = (a + b + c) / 2.0;
    double area = sqrt(s * (s - a) * (s - b) * (s - c));
    return round(area * 100.0) / 100.0;
}
""", "double triangle_area(double a, double b, double c);", """
    CHECK(fabs(triangle_area(3, 4, 5) - 6.0) < 1e-9);
    CHECK(triangle_area(1, 2, 10) == -1.0);
    CHECK(fabs(triangle_area(4, 8, 5) - 8.18) < 1e-9);
"""),
    ("smallest_change", """int smallest_change(const int *arr, int n) {
    int changes = 0;
    for (int i = 0; i < n / 2; i++)
        if (arr[i] != arr[n - 1 - i])
            changes++;
    return changes;
}
""", "int smallest_change(const int *arr, int n);", """
    int a[] = {1, 2, 3, 5, 4, 7, 9, 6};
    int b[] = {1, 2, 3, 2, 1};
    CHECK(smallest_change(a, 8) == 4);
    CHECK(smallest_change(b, 5) == 0);
"""),
    ("is_simple_power", """int is_simple_power(long x, long n) {
    if (n == 1)
        return x == 1;
    long power = 1;
    while (power < x)
        power *= n;
    return power == x;
}
""", "int is_simple_power(long x, long n);", """
    CHECK(is_simple_power(16, 2) == 1);
    CHECK(is_simple_power(143214, 16) == 0);
    CHECK(is_simple_power(9, 3) == 1);
"""),
    ("hex_key", """#include <string.h>

int hex_key(const char *num) {
    const char *primes = "2357BD";
    int total = 0;
    for (size_t i = 0; num[i] != '\\0'; i++)
        if (strchr(primes, num[i]) != NULL)
            total++;
    return total;
}
""", "int hex_key(const char *num);", """
    CHECK(hex_key("AB") == 1);
    CHECK(hex_key("1077E") == 2);
    CHECK(hex_key("123456789ABCDEF0") == 6);
"""),
    ("prime_length", """#include <string.h>

static int check_prime(size_t n) {
    if (n < 2)
        return 0;
    for (size_t d = 2; d * d <= n; d++)
        if (n % d == 0)
            return 0;
    return 1;
}

int prime_length(const char *text) {
    return check_prime(strlen(text));
}
""", "int prime_length(const char *text);", """
    CHECK(prime_length("Hello") == 1);
    CHECK(prime_length("orange") == 0);
    CHECK(prime_length("kittens") == 1);
"""),
    ("add_even_at_odd", """int add_even_at_odd(const int *lst, int n) {
    int sum = 0;
    for (int i = 1; i < n; i += 2)
        if (lst[i] % 2 == 0)
            sum += lst[i];
    return sum;
}
""", "int add_even_at_odd(const int *lst, int n);", """
    int a[] = {4, 88};
    int b[] = {4, 5, 6, 7, 2, 122};
    CHECK(add_even_at_odd(a, 2) == 88);
    CHECK(add_even_at_odd(b, 6) == 122);
"""),
    ("count_nums", """int count_nums(const int *arr, int n) {
    int count = 0;
    for (int i = 0; i < n; i++) {
        int v = arr[i];
        int neg = v < 0;
        if (neg)
            v = -v;
        int sum = 0;
        int first = 0;
        while (v > 0) {
            first = v % 10;
            sum += first;
            v /= 10;
        }
        if (neg)
            sum -= 2 * first;
        if (sum > 0)
            count++;
    }
    return count;
}
""", "int count_nums(const int *arr, int n);", """
    int a[] = {-1, -2, 0};
    int b[] = {1, 1, 2, -2, 3, 4, 5};
    int c[] = {12, 23, 34, -45, -56, 0};
    CHECK(count_nums(a, 3) == 0);
    CHECK(count_nums(b, 7) == 6);
    CHECK(count_nums(c, 6) == 5);
"""),
    ("max_fill", """int max_fill(const int *grid, int rows, int cols, int capacity) {
    int trips = 0;
    for (int r = 0; r < rows; r++) {
        int water = 0;
        for (int c = 0; c < cols; c++)
            water += grid[r * cols + c];
        trips += (water + capacity - 1) / capacity;
    }
    return trips;
}
""", "int max_fill(const int *grid, int rows, int cols, int capacity);", """
    int g[] = {0, 0, 1, 0, 0, 1, 0, 0, 1, 1, 1, 1};
    CHECK(max_fill(g, 3, 4, 1) == 6);
    CHECK(max_fill(g, 3, 4, 2) == 4);
"""),
    ("point_dist2", """struct point {
    int x;
    int y;
};

long point_dist2(const struct point *a, const struct point *b) {
    long dx = (long)a->x - b->x;
    long dy = (long)a->y - b->y;
    return dx * dx + dy * dy;
}
""", "struct point { int x; int y; };\nlong point_dist2(const struct point *a, const struct point *b);", """
    struct point p = {1, 2}, q = {4, 6};
    CHECK(point_dist2(&p, &q) == 25);
    CHECK(point_dist2(&q, &q) == 0);
"""),
    ("list_sum", """#include <stddef.h>

typedef struct node {
    int value;
    struct node *next;
} node_t;

int list_sum(const node_t *head) {
    int total = 0;
    while (head != NULL) {
        total += head->value;
        head = head->next;
    }
    return total;
}
""", "typedef struct node { int value; struct node *next; } node_t;\nint list_sum(const node_t *head);", """
    node_t c = {3, NULL}, b = {5, &c}, a = {7, &b};
    CHECK(list_sum(&a) == 15);
    CHECK(list_sum(NULL) == 0);
"""),
    ("buf_find", """#include <string.h>

struct buffer {
    const char *data;
    size_t len;
};

long buf_find(const struct buffer *buf, const char *needle) {
    size_t n = strlen(needle);
    if (n == 0 || n > buf->len)
        return -1;
    for (size_t i = 0; i + n <= buf->len; i++)
        if (memcmp(buf->data + i, needle, n) == 0)
            return (long)i;
    return -1;
}
""", "struct buffer { const char *data; unsigned long len; };\nlong buf_find(const struct buffer *buf, const char *needle);", """
    struct buffer b = {"hello world", 11};
    CHECK(buf_find(&b, "world") == 6);
    CHECK(buf_find(&b, "xyz") == -1);
    CHECK(buf_find(&b, "h") == 0);
"""),
    ("stack_peak", """#include <stdlib.h>

typedef struct {
    int *items;
    int top;
    int cap;
} stack_t;

static int push(stack_t *s, int v) {
    if (s->top == s->cap) {
        int ncap = s->cap ? s->cap * 2 : 4;
        int *grown = realloc(s->items, sizeof(int) * ncap);
        if (!grown)
            return -1;
        s->items = grown;
        s->cap = ncap;
    }
    s->items[s->top++] = v;
    return 0;
}

int stack_peak(const int *ops, int n) {
    stack_t s = {NULL, 0, 0};
    int peak = 0;
    for (int i = 0; i < n; i++) {
        if (ops[i] > 0)
            push(&s, ops[i]);
        else if (s.top > 0)
            s.top--;
        if (s.top > peak)
            peak = s.top;
    }
    free(s.items);
    return peak;
}
""", "int stack_peak(const int *ops, int n);", """
    int a[] = {1, 2, 3, 0, 0, 4, 5, 6, 7};
    int b[] = {0, 0, 1, 0};
    CHECK(stack_peak(a, 9) == 5);
    CHECK(stack_peak(b, 4) == 1);
"""),
    ("rolling_max_last", """int rolling_max_last(const int *values, int n, int *out) {
    int running = 0;
    for (int i = 0; i < n; i++) {
        if (i == 0 || values[i] > running)
            running = values[i];
        out[i] = running;
    }
    return n > 0 ? out[n - 1] : 0;
}
""", "int rolling_max_last(const int *values, int n, int *out);", """
    int v[] = {1, 2, 3, 2, 3, 4, 2};
    int o[7];
    CHECK(rolling_max_last(v, 7, o) == 4);
    CHECK(o[3] == 3);
"""),
    ("string_xor_count", """#include <string.h>

int string_xor_count(const char *a, const char *b, char *out) {
    size_t n = strlen(a);
    int ones = 0;
    for (size_t i = 0; i < n; i++) {
        out[i] = a[i] == b[i] ? '0' : '1';
        ones += out[i] == '1';
    }
    out[n] = '\\0';
    return ones;
}
""", "int string_xor_count(const char *a, const char *b, char *out);", """
    char buf[16];
    CHECK(string_xor_count("010", "110", buf) == 1);
    CHECK(strcmp(buf, "100") == 0);
    CHECK(string_xor_count("111000", "101010", buf) == 2);
"""),
    ("how_many_times", """#include <string.h>

int how_many_times(const char *text, const char *sub) {
    size_t n = strlen(text), m = strlen(sub);
    int times = 0;
    if (m == 0)
        return 0;
    for (size_t i = 0; i + m <= n; i++)
        if (strncmp(text + i, sub, m) == 0)
            times++;
    return times;
}
""", "int how_many_times(const char *text, const char *sub);", """
    CHECK(how_many_times("", "x") == 0);
    CHECK(how_many_times("xyxyxyx", "x") == 4);
    CHECK(how_many_times("cacacacac", "cac") == 4);
"""),
    ("strlen_words", """#include <ctype.h>

int strlen_words(const char *s) {
    int words = 0;
    int in_word = 0;
    for (; *s; s++) {
        if (isspace((unsigned char)*s)) {
            in_word = 0;
        } else if (!in_word) {
            in_word = 1;
            words++;
        }
    }
    return words;
}
""", "int strlen_words(const char *s);", """
    CHECK(strlen_words("  hello   big world ") == 3);
    CHECK(strlen_words("") == 0);
    CHECK(strlen_words("one") == 1);
"""),
    ("matrix_trace", """struct matrix {
    int n;
    int cells[16];
};

int matrix_trace(const struct matrix *m) {
    int trace = 0;
    for (int i = 0; i < m->n; i++)
        trace += m->cells[i * m->n + i];
    return trace;
}
""", "struct matrix { int n; int cells[16]; };\nint matrix_trace(const struct matrix *m);", """
    struct matrix m = {3, {1, 2, 3, 4, 5, 6, 7, 8, 9}};
    CHECK(matrix_trace(&m) == 15);
"""),
    ("collatz_steps", """int collatz_steps(long n) {
    int steps = 0;
    while (n != 1) {
        n = (n % 2 == 0) ? n / 2 : 3 * n + 1;
        steps++;
    }
    return steps;
}
""", "int collatz_steps(long n);", """
    CHECK(collatz_steps(1) == 0);
    CHECK(collatz_steps(6) == 8);
    CHECK(collatz_steps(27) == 111);
"""),
    ("dup_string_upper", """#include <ctype.h>
#include <stdlib.h>
#include <string.h>

int dup_string_upper(const char *s) {
    size_t n = strlen(s);
    char *copy = malloc(n + 1);
    if (copy == NULL)
        return -1;
    int changed = 0;
    for (size_t i = 0; i <= n; i++) {
        copy[i] = (char)toupper((unsigned char)s[i]);
        if (copy[i] != s[i])
            changed++;
    }
    free(copy);
    return changed;
}
""", "int dup_string_upper(const char *s);", """
    CHECK(dup_string_upper("Hello") == 4);
    CHECK(dup_string_upper("ABC") == 0);
"""),
    ("apply_op", """typedef int (*binop_fn)(int, int);

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
""", "int apply_op(const int *values, int n, int multiply);", """
    int v[] = {1, 2, 3, 4};
    CHECK(apply_op(v, 4, 0) == 10);
    CHECK(apply_op(v, 4, 1) == 24);
"""),
]


def pseudocode(source: str, level: str, index: int) -> str:
    """Stripped-binary style rendering of ``source``."""
    unit = obfuscate(source, extract_reserved(source))
    base = 0x401000 + 0x400 * index

    def rename(m: re.Match) -> str:
        cat, k = m.group(1), int(m.group(2))
        if cat == "func":
            return f"sub_{base + 0x40 * (k - 1):X}"
        if cat == "var":
            return f"v{k}"
        if cat == "field":
            return f"field_{8 * (k - 1):X}"
        return f"struct_{k}"

    body = re.sub(r"\b(func|type|field|var)([0-9]+)\b", rename, unit.ir_text)
    return f"// ----- ({base:08X}) {level} -----\n{body}"


def main() -> None:
    out = Path(__file__).resolve().parent / "bench"
    if out.exists():
        shutil.rmtree(out)
    for i, (name, src, decls, body) in enumerate(FUNCS):
        level = LEVELS[i % len(LEVELS)]
        d = out / f"{i:03d}_{name}"
        d.mkdir(parents=True)
        (d / "source.c").write_text(src)
        (d / "harness.c").write_text(HARNESS.format(decls=decls, body=body.strip("\n")))
        (d / "pseudo.txt").write_text(pseudocode(src, level, i))
        meta = {"opt_level": level, "original_name": name, "stripped": True, "expected_exit": 0}
        (d / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    print(f"wrote {len(FUNCS)} samples to {out}")


if __name__ == "__main__":
    main()
