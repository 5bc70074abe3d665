/** Payload shapes of the recommender HTTP API. */

export interface FacultyProfile {
  faculty_id: string;
  name: string;
  college: string;
  programs: string[];
  interests: string[];
  expertise: string[];
  created_at: string;
  updated_at: string;
  liked_stp_ids?: string[];
}

export interface ProfileInput {
  name: string;
  college: string;
  programs: string[];
  interests: string[];
  expertise: string[];
}

export interface StpItem {
  stp_id: string;
  title: string;
  provider: string;
  start_date: string;
  end_date: string | null;
  url: string | null;
  description: string | null;
  tags: string[];
  source: string;
}

export interface NeighborVote {
  faculty_id: string;
  similarity: number;
}

export interface Recommendation {
  stp_id: string;
  score: number;
  content_component: number;
  collab_component: number;
  matched_terms: string[];
  contributing_neighbors: NeighborVote[];
  item: StpItem;
}

export interface AttendanceRow {
  faculty_name: string;
  college: string;
  title: string;
  provider: string;
  date_attended: string;
}

export interface ReportFilters {
  college?: string;
  from?: string;
  to?: string;
}

export interface ApiErrorBody {
  status: number;
  code: string;
  message: string;
  details?: string[];
}
