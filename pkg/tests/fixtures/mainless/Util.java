class Util {
    int twice(int x) { return helper(x) * 2; }
    int helper(int x) { return x; }
}
