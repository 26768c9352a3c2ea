"""Plan search: greedy, refinement, RL environment, learners, brute force."""
