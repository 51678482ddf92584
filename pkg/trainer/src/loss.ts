/**
 * Asymmetric training loss for allocation regression.
 *
 * Over-allocation (prediction above the true grant) causes interference
 * at protected receivers, so those samples carry their own weight:
 *
 *   J = (1/m) * (aFp * sum_{yHat > y} (yHat - y)^2
 *              + aFn * sum_{yHat <= y} (yHat - y)^2)
 *
 * aFp = aFn reduces to plain (scaled) mean squared error.
 */

import * as tf from '@tensorflow/tfjs'

export type LossFn = (yTrue: tf.Tensor, yPred: tf.Tensor) => tf.Scalar

export function asymmetricSquaredError(alphaFp: number, alphaFn: number): LossFn {
  if (alphaFp <= 0 || alphaFn <= 0) {
    throw new Error('loss weights must be positive')
  }
  // relu(d)^2 and relu(-d)^2 partition the squared error by sign with
  // gradients defined everywhere (the d = 0 term contributes zero to
  // either branch), unlike a where/greater gate
  return (yTrue, yPred) =>
    tf.tidy(() => {
      const diff = tf.sub(yPred, yTrue)
      const over = tf.square(tf.relu(diff))
      const under = tf.square(tf.relu(tf.neg(diff)))
      return tf.mean(tf.add(tf.mul(over, alphaFp), tf.mul(under, alphaFn)))
    }) as tf.Scalar
}
