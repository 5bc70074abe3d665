/** Per-tab UI session state.
 *
 * Holds at most one selected faculty, the last server-confirmed profile,
 * the current feed tagged with the profile revision it was computed for,
 * and a mutation queue that keeps write requests strictly one at a time
 * while reads stay free.
 */

import type { FacultyProfile, Recommendation } from "./types.js";

export class UiSession {
  selectedFacultyId: string | null = null;
  profile: FacultyProfile | null = null;
  likedIds: Set<string> = new Set();
  feed: Recommendation[] = [];
  /** updated_at of the profile the current feed was computed for. */
  feedRevision: string | null = null;
  pendingMutations = 0;

  private mutationChain: Promise<unknown> = Promise.resolve();

  select(profile: FacultyProfile): void {
    this.selectedFacultyId = profile.faculty_id;
    this.applyProfile(profile);
    this.feed = [];
    this.feedRevision = null;
  }

  clear(): void {
    this.selectedFacultyId = null;
    this.profile = null;
    this.likedIds = new Set();
    this.feed = [];
    this.feedRevision = null;
  }

  applyProfile(profile: FacultyProfile): void {
    this.profile = profile;
    if (profile.liked_stp_ids) {
      this.likedIds = new Set(profile.liked_stp_ids);
    }
  }

  setFeed(feed: Recommendation[]): void {
    this.feed = feed;
    this.feedRevision = this.profile ? this.profile.updated_at : null;
  }

  get busy(): boolean {
    return this.pendingMutations > 0;
  }

  /** Serialize mutations: each starts only after the previous one settled. */
  enqueueMutation<T>(operation: () => Promise<T>): Promise<T> {
    this.pendingMutations += 1;
    const run = this.mutationChain.then(operation).finally(() => {
      this.pendingMutations -= 1;
    });
    this.mutationChain = run.catch(() => undefined);
    return run;
  }
}
