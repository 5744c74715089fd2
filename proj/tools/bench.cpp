// Placeholder; serial-vs-parallel benchmarks land here.
int main() { return 0; }
