int smallest_change(const int *arr, int n) {
    int changes = 0;
    for (int i = 0; i < n / 2; i++)
        if (arr[i] != arr[n - 1 - i])
            changes++;
    return changes;
}
