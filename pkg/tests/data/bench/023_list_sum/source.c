#include <stddef.h>

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
