# Lines collected by test_acceptance and printed in the terminal summary.
ACCEPTANCE_LINES = []
