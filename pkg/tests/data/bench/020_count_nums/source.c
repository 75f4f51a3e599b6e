int count_nums(const int *arr, int n) {
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
