#include <ctype.h>
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
