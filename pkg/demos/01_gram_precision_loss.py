"""Why select columns directly instead of forming the information matrix.

The 3x2 matrix below has two linearly independent columns, but its Gram
(information) matrix computed in double precision is exactly singular:
the squared small entries fall below the unit roundoff and vanish.  Rank
detection through the Gram eigenvalues therefore reports rank 1, while
the SVD of the matrix itself resolves the second singular value near
1e-9 and reports rank 2.
"""
from cssident import gram_loss_demo

report = gram_loss_demo(eta=1e-12)

print("matrix:")
print(report.matrix)
print("\nGram matrix as computed in float64 (note the lost 1e-18 terms):")
print(report.gram)
print(f"\nGram eigenvalues        : {report.gram_eigenvalues}")
print(f"singular values         : {report.sigma}")
print(f"rank via Gram eigenvalues: {report.gram_rank}")
print(f"rank via SVD             : {report.css_rank}")
print("\nThe direct route keeps the full numerical rank; the squared")
print("condition number of the Gram matrix destroys it.")
